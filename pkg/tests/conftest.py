from hypothesis import HealthCheck, settings

# Arbitrary-precision arithmetic makes individual examples slow on occasion;
# wall-clock deadlines would only add flakiness.
settings.register_profile(
    "artifact",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("artifact")
