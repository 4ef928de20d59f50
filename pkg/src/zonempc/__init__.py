"""Model-based multi-zone HVAC control with learned ensemble dynamics and sampling MPC."""

__version__ = "0.1.0"
