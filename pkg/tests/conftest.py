import pytest

from rdtm import ModelId, builtin_model, solve_series


@pytest.fixture(scope="session")
def solved():
    """Cache of solved built-in models keyed by (model, order); several test
    modules need the same solutions and the quintic model is not free."""
    specs = {}
    solutions = {}

    def get(model: ModelId, order: int):
        if model not in specs:
            specs[model] = builtin_model(model)
        key = (model, order)
        if key not in solutions:
            solutions[key] = solve_series(specs[model], order)
        return specs[model], solutions[key]

    return get
