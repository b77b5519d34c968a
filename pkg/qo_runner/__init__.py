# Command-line front end: scenario loading and orchestration
__version__ = "1.0.0"
