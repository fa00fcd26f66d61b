"""Unit tests for near-field DAP."""
