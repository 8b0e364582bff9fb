"""
Constants Module
Application-wide constants
"""

# Application Info
APP_NAME = "Ridepool Service Toolkit"
APP_VERSION = "1.0.0"

# Calendar
WEEKDAYS = ["Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"]
WEEKDAY_NAMES = ["Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday", "Sunday"]
REFERENCE_HOUR = 12
# intercept + 6 weekday + 23 hour + 1 holiday dummies
N_COVARIATES = 31

# Passenger group sizes observed in the ride hailing app
GROUP_SIZE_PROBS = [0.804, 0.153, 0.026, 0.011, 0.004, 0.002]

# Travel time regression t = a * c + b (minutes per km, minutes)
TRAVEL_TIME_SLOPE = 2.3634
TRAVEL_TIME_INTERCEPT = 0.2086

# Scenario clock: minute 0 is 22:00 of the evening
SCENARIO_START_HOUR = 22
SECONDS_PER_DAY = 86400

# Depot stop id
DEPOT = 0

# Exit codes
EXIT_OK = 0
EXIT_INPUT_ERROR = 2
EXIT_SOLVER_ERROR = 3

# Report column layout (day, vehicles, cost, denied, four averages)
REPORT_COLUMNS = [
    "day",
    "vehicles",
    "total_routing_cost",
    "pct_denied",
    "avg_regret",
    "avg_wait",
    "avg_ride",
    "avg_transport",
]
METRIC_COLUMNS = ["avg_regret", "avg_wait", "avg_ride", "avg_transport"]

# Error Codes
class ErrorCode:
    SCHEMA_ERROR = "SCHEMA_ERROR"
    MISSING_MODEL = "MISSING_MODEL"
    SEPARATION = "SEPARATION"
    SINGULAR_DESIGN = "SINGULAR_DESIGN"
    EMPTY_CATEGORY = "EMPTY_CATEGORY"
    OUT_OF_SERVICE = "OUT_OF_SERVICE"
    DUPLICATE_REQUEST = "DUPLICATE_REQUEST"
    UNKNOWN_REQUEST = "UNKNOWN_REQUEST"
    NO_CONNECTION = "NO_CONNECTION"
    EMPTY_ACCEPTED_SET = "EMPTY_ACCEPTED_SET"
    REPORT_MISMATCH = "REPORT_MISMATCH"
    INCONSISTENT_FIXING = "INCONSISTENT_FIXING"
    INFEASIBLE = "INFEASIBLE"
    UNKNOWN_ERROR = "UNKNOWN_ERROR"

# Request decision kinds in the event log
class Decision:
    ACCEPTED = "accepted"
    DENIED = "denied"
    TIMEOUT_DENIED = "timeout_denied"

# Event log record types
class EventType:
    REVEAL = "reveal"
    DECISION = "decision"
    PICKUP = "pickup"
    DROPOFF = "dropoff"
    COMMUNICATE = "communicate"
    DEPOT_DEPARTURE = "depot_departure"
    DEPOT_RETURN = "depot_return"
