import os

# Base paths
BASE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
OUTPUT_DIR = os.path.join(BASE_DIR, "output")
LOG_DIR = os.path.join(BASE_DIR, "logs")

# Create directories if they don't exist
os.makedirs(OUTPUT_DIR, exist_ok=True)
os.makedirs(LOG_DIR, exist_ok=True)

# Machine shape
REGISTERS = 4
MESSAGE_SIZE = 3

# Naming
NODE_TAG_BITS = 16
COUNTER_BITS = 48
COMPILE_TAG = 0           # names minted while building nets
STRATEGY_TAG = 0xFFFD     # names minted by reference strategies (cc_traces)
CONTROL_TAG = 0xFFFC      # runtime control ports
ROOT_QUESTION_TAG = 0xFFFE
OPPONENT_TAG = 0xFFFF

# Budgets
SILENT_BUDGET = 10**6
OBSERVABLE_BUDGET = 10**4
DEFAULT_DEPTH = 8
EXPLORE_STATE_BUDGET = 200_000
SYNC_BUDGET = 8           # hidden messages allowed when composing trace sets

# Concurrency settings
MAX_WORKERS = 4
SOCKET_TIMEOUT = 5.0
STARTUP_TIMEOUT = 10.0
RUN_TIMEOUT = 60.0

# Feature flags
ENABLE_PARALLEL = os.environ.get("GAMNET_PARALLEL", "1") != "0"

# Logging
LOG_LEVEL = os.environ.get("GAMNET_LOG", "INFO").upper()

# Exit codes
EXIT_OK = 0
EXIT_BUDGET = 2
EXIT_FAULT = 3
EXIT_CONFIG = 4
