from ._loveres import (
    CalibrationError,
    ClassViolationError,
    DomainError,
    JostSolver,
    LoveresError,
    PotentialProfile,
    ScatteringData,
    ShearProfile,
    SymmetryError,
    __version__,
    calibrate,
    find_zeros,
    forward_scattering_data,
    invert,
    make_potential,
    recover_shear,
    robin_coefficient,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
