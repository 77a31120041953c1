"""kxchain: program-length complexity estimators and entropy-rate experiments.

The package layers up from exact integer codecs, through a register-machine
interpreter and a budgeted enumeration engine for universal machines, to
classical and quantum entropy-rate experiments driven by a single CLI
(``kxchain vm|kx|cls|qc ...``).
"""

__version__ = "0.1.0"
