from mecsfc._core import (  # noqa: F401
    Scenario,
    default_config,
    generate_scenario,
    lambert_w0,
    run_sweep,
    solve,
    solve_knapsack,
    validate,
    __version__,
)
