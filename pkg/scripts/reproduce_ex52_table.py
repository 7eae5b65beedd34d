"""Spatial convergence on ex5.2 (manufactured forcing) for alpha in {1.17, 1.2, 1.5}."""

from fracwsgd.harness import combined_markdown, run_convergence

steps = [1 / 32, 1 / 64, 1 / 128, 1 / 256]
tables = [run_convergence("ex5.2", "spatial", steps, 1 / 1000, alpha=a) for a in (1.17, 1.2, 1.5)]
print(combined_markdown(tables))
