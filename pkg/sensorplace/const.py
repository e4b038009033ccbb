SYMMETRY_TOLERANCE = 1e-10
JITTER_SCALE = 1e-12
MU_TOLERANCE = 1e-9
VACUOUS_THRESHOLD = 1e-12
TIE_TOLERANCE = 1e-12
SUPERMODULAR_SLACK = 1e-9
ORACLE_MAX_N = 20
SIGNIFICANT_DIGITS = 12
THREADS_ENV = "SENSOR_PLACE_THREADS"
