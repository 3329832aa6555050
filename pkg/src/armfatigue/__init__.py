"""Push/pull arm fatigue simulation at the shoulder and elbow."""

__version__ = "0.1.0"
