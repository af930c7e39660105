"""Star-shaped surfaces and distances"""
