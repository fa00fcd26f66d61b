"""Integration tests for near-field DAP."""
