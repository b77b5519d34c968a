# Simulation: run configuration, per-trigger engine, event-log persistence
