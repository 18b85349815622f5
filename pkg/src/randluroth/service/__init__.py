"""HTTP service layer and the shared request handlers."""
