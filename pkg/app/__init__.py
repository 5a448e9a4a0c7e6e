# Main application package

