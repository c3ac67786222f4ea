from .freegeo import (
    FreeWord,
    GeodesicWindow,
    axis_of,
    cyclic_reduction,
    embed_string,
    is_axis,
    same_class,
    shift_geodesic,
)
from .measures import (
    Bernoulli,
    Markov,
    PeriodicOrbit,
    WindowWord,
    sample_window,
    sample_windows,
    shift_window,
)
from .subshift import (
    SubshiftFamily,
    admits,
    factor_set,
    find_periodic,
    periodic_factors_ok,
    shortest_period,
    thue_morse,
    thue_morse_family,
    window_graph,
)

__all__ = [
    "Bernoulli", "FreeWord", "GeodesicWindow", "Markov", "PeriodicOrbit", "SubshiftFamily", "WindowWord",
    "admits", "axis_of", "cyclic_reduction", "embed_string", "factor_set", "find_periodic", "is_axis",
    "periodic_factors_ok", "same_class", "sample_window", "sample_windows", "shift", "shift_geodesic",
    "shift_window", "shortest_period", "thue_morse", "thue_morse_family", "window_graph",
]


def shift(w, k):
    """Shift a WindowWord or GeodesicWindow k times."""
    if isinstance(w, GeodesicWindow):
        return shift_geodesic(w, k)
    return shift_window(w, k)
