pytest_plugins = [
    "fixtures.systems",
]
