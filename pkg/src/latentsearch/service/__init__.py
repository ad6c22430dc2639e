"""HTTP service layer (FastAPI app and its pydantic schemas)."""
