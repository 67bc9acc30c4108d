"""CLI entrypoints.

Installed as the ``relation-anomaly`` script; ``python -m relation_anomaly``
runs the same parser.
"""
