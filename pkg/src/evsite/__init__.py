"""EV charging-station siting: per-LGA constraint-adjusted DBSCAN over GPS trip data."""

__version__ = "0.1.0"
