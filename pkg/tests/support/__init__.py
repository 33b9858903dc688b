# test support package
