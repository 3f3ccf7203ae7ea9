"""CRL-free certificate management for vehicular networks, with a road simulator."""

__version__ = "0.1.0"
