"""SPDC simulation in 1D nonlinear photonic-band-gap multilayers."""

from ._core import (  # noqa: F401
    AntisymProfile,
    ConditionalDetection,
    DesignScanResult,
    HOMTrace,
    JointSpectralAmplitude,
    Material,
    MaterialLibrary,
    Multilayer,
    PbgError,
    Peak,
    RateMap,
    SchemeConfig,
    SpectralCurve,
    TemporalAmplitude,
    __version__,
    antisym_decompose,
    conditional_detection,
    design_scan,
    find_transmission_peaks,
    generation_rate_map,
    hom_rate,
    hom_rate_general,
    idler_geometry,
    jsa_cw,
    jsa_pulsed,
    load_materials,
    load_structure,
    run_scenario,
    scheme,
    temporal_amplitude,
    transmission_spectrum,
    transmittance,
)
