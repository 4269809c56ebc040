"""Bundled material data."""
