"""Test fixtures for near-field DAP."""
