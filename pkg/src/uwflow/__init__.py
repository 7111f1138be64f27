"""uwflow: decision-negative underwriting workflow engine with adversarial
self-critique, plus the simulation and evaluation harness around it."""

__version__ = "0.1.0"
