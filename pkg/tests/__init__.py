"""Tests for uwqkd."""
