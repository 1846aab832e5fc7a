"""Library-wide defaults. Every knob here can be overridden per call."""

TOLERANCE = 1e-9
ENUMERATION_CAP = 2**26
SEED = 0xC0FFEE
FLOAT_DIGITS = 12
