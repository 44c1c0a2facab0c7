# Small helpers shared by core, harness and server
