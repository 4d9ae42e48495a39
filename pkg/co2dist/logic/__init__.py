"""Statistical core: ingest, distributions, fitting, tests, Gibrat, trends, policy."""
