"""Physical constants (SI)."""

HBAR = 1.0545718176461565e-34  # J*s
C_VACUUM = 3.0e8  # m/s, value conventionally used with the tabulated parameters
