"""Rate-analysis constants"""

# Rate function branches
BRANCH_POWER = "k^beta"
BRANCH_LOG = "k^beta/log k"
BRANCH_C = "k^C"

VALID_BRANCHES = [
    BRANCH_POWER,
    BRANCH_LOG,
    BRANCH_C
]

# Recursion forcing
FORCING_EQUALITY = "equality"
FORCING_INEQUALITY_MAX = "inequality_max"

VALID_FORCINGS = [
    FORCING_EQUALITY,
    FORCING_INEQUALITY_MAX
]

# beta_tilde and C closer than this select the logarithmic branch
BRANCH_TIE_TOL = 1e-12

# Quantiles reported for ensembles, in percent
REPORT_QUANTILES = (10, 25, 50, 75, 90)
