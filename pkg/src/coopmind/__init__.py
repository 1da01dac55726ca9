"""coopmind: offline action-forecast training for a black-box kitchen
agent, plus a realtime cooperative game server that overlays the
forecasts for a human teammate."""

__version__ = "0.1.0"
