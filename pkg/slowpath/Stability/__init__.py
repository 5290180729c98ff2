from slowpath.Stability.stability import (
    LayerStability,
    StabilityReport,
    compute_stability,
    layer_stability,
    layer_stats,
    map_scale,
    map_window,
    match_layers,
    pool_stability,
)
