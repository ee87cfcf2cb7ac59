"""Tests for greedy-sbtm."""
