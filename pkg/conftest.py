from hypothesis import settings

# property suites run at least 100 examples each
settings.register_profile('catalog', max_examples=100, deadline=None)
settings.register_profile('deep', max_examples=1000, deadline=None)
settings.load_profile('catalog')
