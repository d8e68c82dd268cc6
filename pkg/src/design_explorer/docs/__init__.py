"""Documentation generation."""
