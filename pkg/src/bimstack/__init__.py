"""BIM microservice stack: versioned model store, isolated IFC execution
service, MCP tool server, and an evaluation harness."""

__version__ = "0.1.0"
