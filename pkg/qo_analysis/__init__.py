# Analysis: configuration sorting, dark subtraction, estimators, result tables
