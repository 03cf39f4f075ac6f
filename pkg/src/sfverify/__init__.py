"""Translation validation for hierarchical state-machine charts.

Interpret a chart under its step semantics, synthesize the retrieve
relation tying chart state to the record layout of generated step code,
derive a normal-form sequential program from the chart, and check a
candidate implementation against it by structural matching plus randomized
co-simulation.
"""

__version__ = "0.1.0"
