__title__ = 'dipl0'
__description__ = 'Edge-preserving image smoothing with a deep image prior under an l0 gradient regularizer.'
__version__ = '0.1.0'
