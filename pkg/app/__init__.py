# Ridepool Service Toolkit
# Main Application Package

__version__ = "1.0.0"
__author__ = "Ridepool Toolkit Team"
