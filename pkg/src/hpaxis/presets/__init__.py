"""Shipped scenario configuration files (*.cfg)."""
