# Modules package

