"""greedy-sbtm - Stochastic Block Transition Models fitted by exact ICL maximisation."""

__version__ = "0.1.0"
