# -*- coding: utf-8 -*-
"""
Created on Mon Sep 14 10:20:03 2026

@author: compamg developers
"""

import configparser
import os
import time


class SolverError(RuntimeError):
    '''
    Base class for numerical failures of the solver stack.
    The command line maps it to exit code 1
    '''


class NotPositiveDefiniteError(SolverError):
    '''
    Raised when a matrix or a preconditioner is found not s.p.d.
    '''


class NotCoarsenableError(SolverError):
    '''
    Raised when the finest level cannot be aggregated with the given candidates
    '''


class DivergenceError(SolverError):
    '''
    Raised when a stationary iteration blows up
    '''


def GetCurrentTime():
    '''
    (None) -> str
    
    Return a formatted string with current local time
    '''
    
    date = time.strftime('%Y-%m-%d %H:%M:%S', time.localtime())    
    return '[{0}] '.format(date)


def ConvertArgToBool(argument):
    '''
    (str) -> bool
    
    :param argument: Argument of a parameter that should be a boolean
    
    Return the argument as a boolean 
    '''
    
    if isinstance(argument, bool):
       return argument
    elif argument.lower() in ('yes', 'true', 't', 'y', '1'):
        return True
    elif argument.lower() in ('no', 'false', 'f', 'n', '0'):
        return False
    else:
        raise ValueError('ERR: {0} is expected to be a boolean'.format(argument))


def ReadConfig(configfile):
    '''
    (str | None) -> configparser.ConfigParser
    
    :param configfile: Path to the ini config file or None
    
    Return a parser holding the config sections. The parser is empty if no
    config file is given
    '''
    
    config = configparser.ConfigParser()
    if configfile not in [None, '']:
        if os.path.isfile(configfile) == False:
            raise FileNotFoundError('cannot open {0}'.format(configfile))
        config.read(configfile)
    return config


def GetParameter(config, section, key, value, default, cast):
    '''
    (configparser.ConfigParser, str, str, any, any, callable) -> any
    
    :param config: Parser returned by ReadConfig
    :param section: Section of the config file, eg. 'ADAPTIVE'
    :param key: Parameter name in the section
    :param value: Value passed from the command. None if not provided
    :param default: Value used when neither the command nor the config provide one
    :param cast: Function converting the config string into the parameter type
    
    Return the parameter value. The command has precedence over the config file,
    the config file has precedence over the default
    '''
    
    if value is not None:
        return value
    if config.has_option(section, key):
        raw = config[section][key]
        try:
            return cast(raw)
        except ValueError:
            raise ValueError('ERR: Invalid value {0} for {1} in section {2}'.format(raw, key, section))
    return default


def CheckFilePath(L):
    '''
    (list) -> None
    
    :param L: List of files
    
    Raise a FileNotFoundError if any file in L doesn't have a valid path
    '''
    
    for i in L:
        if os.path.isfile(i) == False:
            raise FileNotFoundError('cannot open {0}'.format(i))


def CreateOutputDir(filename):
    '''
    (str) -> None
    
    :param filename: Path to an output file
    
    Create the parent directory of filename if it doesn't exist
    '''
    
    directory = os.path.dirname(os.path.abspath(filename))
    if os.path.isfile(directory) == True:
        raise ValueError('ERR: Output directory cannot be a file')
    os.makedirs(directory, exist_ok=True)


def ParseRange(text):
    '''
    (str) -> range
    
    :param text: Inclusive range written as 'first:last' or a single integer
    
    Return the corresponding range of integers
    '''
    
    try:
        if ':' in text:
            first, last = text.split(':')
            first, last = int(first), int(last)
        else:
            first = last = int(text)
    except ValueError:
        raise ValueError('ERR: Incorrect range {0} (should look like 1:10)'.format(text))
    if first < 0 or last < first:
        raise ValueError('ERR: Incorrect range {0} (should look like 1:10)'.format(text))
    return range(first, last + 1)
