# Core application configuration

