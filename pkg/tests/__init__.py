"""Tests for near-field DAP."""
