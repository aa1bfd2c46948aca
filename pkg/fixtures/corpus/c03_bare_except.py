def rain():
    total = 0.0
    count = 0
    while True:
        line = input("Enter rainfall or -999 to stop: ")
        if line == "-999":
            break
        try:
            value = float(line)
        except:
            continue
        if value < 0:
            continue
        total = total + value
        count = count + 1
    if count > 0:
        return total / count
    return 0

if __name__ == "__main__":
    print(rain())
