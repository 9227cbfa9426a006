from hypothesis import settings

# numba compiles on first call, which would trip per-example deadlines
settings.register_profile("default", deadline=None)
settings.load_profile("default")
