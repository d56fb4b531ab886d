"""Deterministic human-swarm-interaction testbed.

A grid-world swarm simulator (PSO LBEST target search under dynamic
hazards) that an operator steers through a live console, instrumented
for situation-awareness assessment (SAGAT/SART) and task-performance
measurement, with a batch statistics pipeline over session logs.
"""

__version__ = "0.1.0"
