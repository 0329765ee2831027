"""Make tests a package."""
