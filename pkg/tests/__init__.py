# Tests package


