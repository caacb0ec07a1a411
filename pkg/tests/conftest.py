from hypothesis import settings

# reproducible across machines and runs
settings.register_profile("ci", derandomize=True, deadline=None)
settings.load_profile("ci")
