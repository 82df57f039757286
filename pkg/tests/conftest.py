from hypothesis import settings

# numba compiles on first call, which would trip hypothesis' per-example deadline
settings.register_profile("default", deadline=None)
settings.load_profile("default")
