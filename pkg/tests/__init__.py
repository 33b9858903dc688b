# test package marker
