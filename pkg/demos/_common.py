"""Shared bits for the demo scripts: where pictures go."""
import os
from pathlib import Path

OUT = Path(os.environ.get("DEMO_OUT", "demo_output"))
OUT.mkdir(parents=True, exist_ok=True)
