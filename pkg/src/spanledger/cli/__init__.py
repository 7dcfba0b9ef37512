"""Command line interface: scenario files in, versioned CSV/JSON tables out."""
from .config import ScenarioConfig, load_config, parse_config
from .main import main

__all__ = ["ScenarioConfig", "load_config", "parse_config", "main"]
